"""
icbargain - Bargaining over interference-channel rate regions

Computes achievable rate regions of the two-user Gaussian interference
channel (and its MAC and TDM variants), decides whether selfish users gain
from cooperating, and solves the resulting bargaining problem for the Nash
bargaining solution and the equilibrium of the alternating-offer game with
breakdown risk.
"""

__version__ = "1.0.0"
