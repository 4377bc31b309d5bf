"""Sets up the logging format of the dynchain package logger"""
import logging

FORMAT = "[%(lineno)3s - %(funcName)20s() ] %(message)s"
logging.basicConfig(format=FORMAT)
logger = logging.getLogger("dynchain")
logger.setLevel(logging.CRITICAL)


def enable_logging(level: int = logging.INFO, log_file: str = None):
    """
    Make the package logger emit records, e.g., when running from the command line.

    :param level: minimum level of records that are emitted
    :param log_file: if given, records are additionally written to this file
    """
    logger.setLevel(level)
    for handler in [h for h in logger.handlers if isinstance(h, logging.FileHandler)]:
        logger.removeHandler(handler)
        handler.close()
    if log_file is not None:
        handler = logging.FileHandler(log_file, mode="w", encoding="utf-8")
        handler.setFormatter(logging.Formatter("%(asctime)s %(levelname)s %(message)s"))
        logger.addHandler(handler)
    return logger
