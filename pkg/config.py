import os
from typing import Tuple
from dotenv import load_dotenv


class Settings:
    TOOL_NAME: str = "callosim"
    TOOL_VERSION: str = "1.0.0"

    # Canonical training geometry: 0.5 mm isotropic, 256^3 canvas
    TARGET_SPACING: Tuple[float, float, float] = (0.5, 0.5, 0.5)
    TARGET_DIMS: Tuple[int, int, int] = (256, 256, 256)

    CONFIG_DIR: str = os.path.join(os.path.dirname(os.path.abspath(__file__)), "configs")
    AUGMENTATION_CONFIG: str = os.path.join(CONFIG_DIR, "augmentation.json")
    SYNTH_CONFIG: str = os.path.join(CONFIG_DIR, "synthesis.json")

    DEFAULT_WORKERS: int = 1
    DEBUG: bool = False

    @classmethod
    def get_conf(cls):
        load_dotenv()
        workers = os.getenv("CALLOSIM_WORKERS")
        if workers:
            cls.DEFAULT_WORKERS = max(1, int(workers))
        return cls


settings = Settings.get_conf()
