import json
from pathlib import Path
from typing import Optional

from pydantic import ConfigDict, Field, model_validator

from isostables.dynamics.schemas import ModelConfig
from isostables.field.schemas import ContourConfig, FieldConfig, GridSpec
from isostables.flow.schemas import IntegrationOptions, TrajectoryConfig
from isostables.laplace.schemas import LaplaceOptions
from isostables.validation.schemas import ValidateConfig


class RunConfig(ModelConfig):
    """
    Schema of a JSON run config: the model plus the numerics and parameters of
    every command. Sections a command does not use are ignored by it.
    """
    grid: Optional[GridSpec] = Field(None, description="Sample points for the field command")
    integration: IntegrationOptions = Field(default_factory=IntegrationOptions)
    laplace: LaplaceOptions = Field(default_factory=LaplaceOptions)
    trajectory: Optional[TrajectoryConfig] = None
    field: FieldConfig = Field(default_factory=FieldConfig)
    contour: Optional[ContourConfig] = None
    validate_: ValidateConfig = Field(default_factory=ValidateConfig, alias="validate")

    model_config = ConfigDict(
        extra="forbid",
        populate_by_name=True,
        json_schema_extra={
            "example": {
                "model": "fitzhugh_nagumo",
                "params": {"I": 0.05, "eps": 0.08, "gamma": 1.0, "a": 1.0},
                "grid": {"bounds": [[-1.0, 2.0], [-1.0, 1.0]], "resolution": [100, 100]},
                "integration": {"horizon": 50.0},
                "contour": {"quantity": "magnitude", "levels": [0.1, 0.5, 1.0]},
            }
        },
    )

    @model_validator(mode="after")
    def check_integration_section(self) -> "RunConfig":
        if "integration" in self.laplace.model_fields_set:
            raise ValueError("give integration options at the top level, not inside 'laplace'")
        return self

    def laplace_options(self) -> LaplaceOptions:
        """Laplace options carrying the top-level integration options"""
        return self.laplace.model_copy(update={"integration": self.integration})


def load_config(path: Path) -> RunConfig:
    """Read and validate a run config; JSON and schema errors propagate to the CLI handler."""
    data = json.loads(Path(path).read_text(encoding="utf-8"))
    return RunConfig.model_validate(data)
