"""Min-norm solver, MGDA loop and the preference searches built on it."""
