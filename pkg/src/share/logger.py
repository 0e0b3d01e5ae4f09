"""
Parent logger for every rideshare package (rideshare.netio, rideshare.assign, ...)
"""
import logging

logger = logging.getLogger("rideshare")
logger.setLevel(logging.INFO)

# one stream handler on the parent; children propagate to it
if not logger.handlers:
    handler = logging.StreamHandler()
    formatter = logging.Formatter("%(asctime)s - %(name)s - %(levelname)s - %(message)s")
    handler.setFormatter(formatter)
    logger.addHandler(handler)
    logger.propagate = False


def set_debug(debug: bool):
    logger.setLevel(logging.DEBUG if debug else logging.INFO)
