"""figpipe: renders publication-style figures from kdirac run output.

Consumes only the documented external formats (CSV schemas and the DKD1
snapshot container); it does not import the simulator.
"""

__version__ = "0.1.0"
