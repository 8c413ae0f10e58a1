"""Pareto Forecast - preference-based multi-objective optimization for service parts demand."""
