"""Test package for skewbench."""
