"""presslab: visual contact-pressure estimation with F/T weak labels,
a synthetic gripper world, and a pressure-servo grasping controller."""

__version__ = "0.1.0"
