"""Hypothesis strategies shared by the test modules."""

from hypothesis import strategies as st

seeds = st.integers(min_value=0, max_value=10_000)
