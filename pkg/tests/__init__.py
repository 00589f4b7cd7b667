"""Unit test package for dtqw_cycle_qnn."""
