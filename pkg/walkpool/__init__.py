"""WalkPool link prediction: random-walk profiles over enclosing subgraphs"""

__version__ = "1.0.0"
