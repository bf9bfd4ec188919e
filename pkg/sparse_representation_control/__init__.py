"""
Sparse representations for incremental control: distributional (Set-KL)
regularizers, MSTDE pretraining and Sarsa(0) evaluation on classic domains.
"""
__version__ = "0.1.0"
