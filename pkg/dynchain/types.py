from typing import Any, Dict, List, Union

import numpy as np

MISSING = np.nan
"""
Marker for a missing feature value and for a label that has not been propagated yet.
Label-feature probabilities lie in [0, 1], NaN never collides with one of them.
"""

FeatureMatrix = np.ndarray
"""
A float array of shape ``(M, K)`` (or ``(M, K + N)`` for label-augmented data).
Missing values are ``MISSING``, all other values are finite.
"""

LabelMatrix = np.ndarray
"""An integer array of shape ``(M, N)`` with entries in ``{0, 1}``."""

ActiveMask = np.ndarray
"""
A boolean array of shape ``(M, N)``.
Cells that are ``False`` contribute neither gradient nor Hessian to any statistic during training.
"""

ProbabilityMatrix = np.ndarray
"""A float array of shape ``(M, N)`` with predicted probabilities in (0, 1)."""

PropagationMatrix = np.ndarray
"""
A float array of shape ``(M, N)`` holding propagated probabilities.
Cells that have not been propagated yet are ``MISSING``.
"""

ModelDump = Dict[str, Any]
"""
A JSON compatible dictionary describing a trained model.
Every dump has a ``kind`` key, e.g. ``mlxgb``, ``br``, ``cc`` or ``xdcc``.
"""

TreeDump = Dict[str, Union[int, float, bool, List[float], "TreeDump"]]
"""
A nested dictionary describing one tree.
Split nodes have the keys ``feature``, ``threshold``, ``default_left``, ``left`` and ``right``,
leaf nodes have the key ``weights``.

Example:

.. code:: python

    {
        "feature": 3,
        "threshold": 0.25,
        "default_left": True,
        "cover": 12.5,
        "left": {"weights": [0.2, -0.1], "cover": 4.0},
        "right": {"weights": [-0.3, 0.05], "cover": 8.5},
    }

"""
