"""Exact computations with formal group laws and oriented cohomology of split quadrics."""
