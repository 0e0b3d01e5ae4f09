import logging

logger = logging.getLogger("rideshare.cli")

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_NOT_CONVERGED = 2
EXIT_VERIFY_FAILED = 3

SWEEP_PARAMETERS = ["nu_d_rd", "alpha_driver"]


class ScenarioConfigError(ValueError):
    pass
