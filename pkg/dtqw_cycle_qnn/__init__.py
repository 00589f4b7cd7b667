"""Top-level package for DTQW Cycle QNN."""

__author__ = """DTQW Cycle QNN developers"""
__email__ = ''
__version__ = '0.1.0'
