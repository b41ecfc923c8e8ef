"""pediloop: a pedestrian-in-the-loop traffic simulation harness.

Live sessions run a deterministic fixed-timestep world with a human-driven
pedestrian avatar and a scripted autonomous vehicle; sessions are recorded,
replayed with simulated sensors, and interaction quality is scored with a
presence questionnaire.
"""

__version__ = "0.1.0"
