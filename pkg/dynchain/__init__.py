"""Multi-label gradient boosted trees and dynamic classifier chains"""
from .errors import *
from .types import *
from .dataset import *
from .gains import *
from .booster import *
from .abstract_model import *
from .metrics import *
from .chain import *
from .baselines import *
from .evaluation import *
from .model_io import *

__version__ = "0.1.0"
