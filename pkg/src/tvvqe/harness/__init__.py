"""Experiment harness: configs, CSV/SVG output and the command-line runner."""
