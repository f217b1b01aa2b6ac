"""Test suite for fracchain."""
