# This file marks the share directory as a Python package.
