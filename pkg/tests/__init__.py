"""Test suite for spin_inverse."""
