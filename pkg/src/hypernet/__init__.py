import logging

logger = logging.getLogger("rideshare.hypernet")

# RD status tags
WITHOUT_PASSENGER = -1
WITH_PASSENGER = 0

# tags of the distinguished solo classes
SOLO_LEVEL = 1
PT_TAG = 0
RP_QUIT_TAG = 1
