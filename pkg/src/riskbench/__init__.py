"""Risk preferences of epsilon-Greedy bandit algorithms: simulation toolkit."""
