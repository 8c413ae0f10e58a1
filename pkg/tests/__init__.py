"""Test suite for Pareto Forecast."""
