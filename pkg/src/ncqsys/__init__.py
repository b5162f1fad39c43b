"""Exact-arithmetic engine for commutative and noncommutative discrete
integrable systems: Q-systems, T-systems and quantum Q-systems, verified
through weighted-path partition functions, continued fractions and
quasi-determinant identities."""

__version__ = "0.1.0"
