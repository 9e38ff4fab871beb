"""Social gradient fields for multi-agent particle games.

Pipeline: harvest event-triggered examples from the world engine, fit
score networks to them by denoising score matching, compose the resulting
gradient fields into observations and shaped rewards, train per-role PPO
policies, and evaluate with cross-match tournaments and navigation metrics.
"""

__version__ = "0.1.0"
