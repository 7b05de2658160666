"""Pre-global-routing DRC hotspot prediction."""
