"""beeloop: seeded bee foraging simulation with a closed patch-placement loop."""

__version__ = "0.1.0"
