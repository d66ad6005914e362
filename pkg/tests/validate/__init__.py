# This file marks the validate directory as a Python package.
