"""Synthetic demand data, forecasting models, losses and metrics."""
