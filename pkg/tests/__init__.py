# Tests for Swarm Fusion
