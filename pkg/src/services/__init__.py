# src/services/__init__.py
"""
Computation services of the lab: linear processes, marginal models,
empirical/quantile processes, rate constants, statistics, experiments and
report output.
"""
