# mypy: ignore-errors

"""
Settings for cva-lab.
"""
from importlib.resources import files as import_resource_files
import json
from pathlib import Path
from typing import List, Type, TypeVar, Union

import requests
from pydantic import Field, field_validator, model_validator
from pydantic_settings import BaseSettings, SettingsConfigDict

DEFAULT_CONFIG_FILE_PATH = str(Path.home().joinpath(".cva_lab.json"))


S = TypeVar("S", bound="CvaLabSettings")


class CvaLabSettings(BaseSettings):
    """
    Settings for cva-lab
    """

    config_file: str = Field(DEFAULT_CONFIG_FILE_PATH, description="File to load alternative defaults from")

    DEFAULT_VALUES: List[Union[int, str]] = Field(
        [0, 1],
        description="Value set S assigned to each atom by state tuples",
    )

    DEFAULT_CAP: int = Field(
        4,
        description="Global trace length cap L_max used wherever a universe of traces is enumerated",
    )

    MAX_GROUND_ATOMS: int = Field(
        12,
        description="Largest ground set accepted by the topology constructors",
    )

    SAMPLES: int = Field(
        200,
        description="Number of sampled instances per law when exhaustive enumeration is too large",
    )

    SAMPLE_MAX_TRACES: int = Field(
        6,
        description="Largest number of traces in a randomly sampled valuation",
    )

    SAMPLE_MAX_LENGTH: int = Field(
        2,
        description="Largest trace length in a randomly sampled valuation",
    )

    EXHAUSTIVE_LIMIT: int = Field(
        2**16,
        description="Checks enumerate every instance when there are at most this many",
    )

    SEED: int = Field(
        0,
        description="Seed for the random valuation sampler; always recorded in reports",
    )

    LAW_CATALOG_FILENAME: Union[str, Path] = Field(
        default=import_resource_files("cva_lab") / "law_catalog.yaml",
        description="Path to the YAML file describing every checked law.",
    )

    model_config = SettingsConfigDict(env_prefix="cva_lab_", extra="ignore")

    @model_validator(mode="before")
    @classmethod
    def load_default_settings(cls, values):
        """
        Loads settings from a root file if available and uses that as defaults in
        place of built in defaults
        """
        config_file_path: str = values.get("config_file", DEFAULT_CONFIG_FILE_PATH)

        new_values = {}

        if config_file_path.startswith("http"):
            new_values = requests.get(config_file_path, timeout=30).json()
        elif Path(config_file_path).exists():
            with open(config_file_path) as f:
                new_values = json.load(f)

        new_values.update(values)

        return new_values

    @classmethod
    def autoload(cls: Type[S], settings: Union[None, dict, S]) -> S:  # noqa
        if settings is None:
            return cls()
        elif isinstance(settings, dict):
            return cls(**settings)
        return settings

    @field_validator("DEFAULT_CAP", "SAMPLES", "SAMPLE_MAX_TRACES", "SAMPLE_MAX_LENGTH", "EXHAUSTIVE_LIMIT")
    @classmethod
    def non_negative(cls, value):  # noqa
        if value < 0:
            raise ValueError("must be non-negative")
        return value

    @field_validator("DEFAULT_VALUES")
    @classmethod
    def nonempty_values(cls, value):  # noqa
        if len(value) == 0 or len(set(value)) != len(value):
            raise ValueError("value set must be nonempty and duplicate free")
        return value

    def as_dict(self):
        """
        HotPatch to enable serializing CvaLabSettings via Monty
        """
        return self.model_dump(exclude_unset=True, exclude_defaults=True)
