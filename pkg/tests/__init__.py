"""Tests for the Levy-Attack toolkit."""
