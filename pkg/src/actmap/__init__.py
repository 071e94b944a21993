"""actmap: constrained-RL workbench built around action mapping.

Pretrains a generative feasibility policy against a feasibility model, then
trains latent-space objective policies (AM-SAC / AM-PPO) alongside baseline
safe-RL methods in two constrained environments plus an analytic toy.
"""

__version__ = "0.1.0"
