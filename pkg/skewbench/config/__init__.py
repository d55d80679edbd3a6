from skewbench.config.settings import Settings, settings

__all__ = ["Settings", "settings"]
