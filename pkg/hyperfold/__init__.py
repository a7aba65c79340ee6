"""hyperfold: numerics for two-geodesic phases, wave kernels and oscillatory decay on H^3."""

__version__ = "0.1.0"
