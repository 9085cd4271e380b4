"""Swarm pursuit-evasion engine."""
