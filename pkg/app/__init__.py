# Swarm Fusion - parallel MRF energy minimization
