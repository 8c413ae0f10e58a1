"""Problems the optimizers run on: toys with known Pareto sets and demand forecasting."""
