"""Subgoal representations for goal-conditioned hierarchical RL.

Library layout:

- tensor / nn / optim / checkpoint: float64 autodiff substrate, MLPs, Adam,
  binary parameter containers.
- tabular / maze: finite MDPs for exact certification and native 2-D point
  mazes with nuisance-augmented observations.
- divergence: exact categorical KL / total variation and the window weights.
- bounds: the goal-to-policy mapping on tabular MDPs, exact sub-optimality,
  and numerical certification of the value-gap bounds.
- energy: the learned representation stack (energy model, contrastive loss,
  log-partition estimator, affine probe).
- buffer / agent: replay windows, the two-level actor-critic agent, and the
  training loop.
- cli: verify-bounds / train / eval / dump-repr / probe commands.
"""

__version__ = "0.1.0"
