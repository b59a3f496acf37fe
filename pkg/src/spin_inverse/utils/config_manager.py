"""Configuration management for spin-inverse runs."""

import json
from pathlib import Path
from typing import Any, Dict, List, Optional

import yaml
from pydantic import ValidationError

from spin_inverse.errors import UsageError
from spin_inverse.models import MsParams, RunConfig
from spin_inverse.utils.logger import setup_logger

logger = setup_logger(__name__)

DEFAULT_CONFIG_NAMES = (".spin-inverse.json", ".spin-inverse.yaml")


def _parse(text: str) -> Any:
    """JSON when it parses as JSON (exponent floats included), YAML otherwise."""
    try:
        return json.loads(text)
    except json.JSONDecodeError:
        return yaml.safe_load(text)


def _read_document(path: Path) -> Any:
    try:
        return _parse(path.read_text(encoding="utf-8"))
    except OSError as e:
        raise UsageError(f"cannot read {path}: {e.strerror}", key="config") from e
    except yaml.YAMLError as e:
        raise UsageError(f"{path} is not valid JSON or YAML: {e}", key="config") from e


def _validation_key(error: ValidationError) -> str:
    first = error.errors()[0]
    return ".".join(str(part) for part in first["loc"]) or "config"


def _validation_message(error: ValidationError) -> str:
    first = error.errors()[0]
    return first["msg"].removeprefix("Value error, ")


def load_cases(path: Path) -> List[MsParams]:
    """Read a case list: a JSON/YAML list of parameter sets, or {"cases": [...]}.

    Raises:
        UsageError: naming the ``cases`` key on any problem
    """
    document = _read_document(Path(path))
    if isinstance(document, dict) and "cases" in document:
        document = document["cases"]
    if not isinstance(document, list) or not document:
        raise UsageError(f"{path} must hold a non-empty list of cases", key="cases")
    cases = []
    for index, entry in enumerate(document):
        try:
            cases.append(MsParams.model_validate(entry))
        except ValidationError as e:
            raise UsageError(
                f"case {index + 1} in {path}: {_validation_key(e)}: {_validation_message(e)}",
                key="cases",
            ) from e
    return cases


class ConfigManager:
    """Loads the optional flat config document and builds RunConfig objects.

    Precedence is built-in defaults < config document < command-line flags.
    """

    def __init__(self, config_path: Optional[Path] = None, config_text: Optional[str] = None):
        """Initialize configuration manager.

        Args:
            config_path: Explicit config file; it must exist
            config_text: Config document given inline (wins over any file)
        """
        self.config_path = Path(config_path) if config_path else None
        self.config: Dict[str, Any] = {}
        self._load_config(config_text)

    @staticmethod
    def default_config_paths() -> List[Path]:
        return [Path.cwd() / name for name in DEFAULT_CONFIG_NAMES]

    def _load_config(self, config_text: Optional[str]) -> None:
        """Load configuration from text, the explicit file or a default location."""
        if config_text is not None:
            try:
                document = _parse(config_text)
            except yaml.YAMLError as e:
                raise UsageError(f"config text is not valid JSON or YAML: {e}", key="config") from e
        elif self.config_path is not None:
            if not self.config_path.exists():
                raise UsageError(f"config file {self.config_path} does not exist", key="config")
            document = _read_document(self.config_path)
        else:
            document = None
            for path in self.default_config_paths():
                if path.exists():
                    document = _read_document(path)
                    self.config_path = path
                    break

        if document is None:
            self.config = {}
            return
        if not isinstance(document, dict):
            raise UsageError("config document must be a flat key-value mapping", key="config")
        # An emitted manifest carries the run configuration under "config".
        if isinstance(document.get("config"), dict):
            document = document["config"]
        self.config = dict(document)
        logger.debug(f"Loaded {len(self.config)} config key(s) from {self.config_path or 'text'}")

    def build_run_config(
        self,
        command: Optional[str] = None,
        overrides: Optional[Dict[str, Any]] = None,
    ) -> RunConfig:
        """Merge the config document with flag overrides and validate.

        Args:
            command: Subcommand name; falls back to the document's ``command``
            overrides: Flag values; None entries are ignored

        Returns:
            Validated RunConfig with every field the command needs

        Raises:
            UsageError: unknown key, type mismatch or missing field, naming the key
        """
        merged: Dict[str, Any] = dict(self.config)
        if overrides:
            merged.update({key: value for key, value in overrides.items() if value is not None})
        if command is not None:
            merged["command"] = command
        if "command" not in merged:
            raise UsageError("no command given", key="command")

        if isinstance(merged.get("cases"), (str, Path)):
            merged["cases"] = load_cases(Path(merged["cases"]))

        try:
            config = RunConfig(**merged)
        except ValidationError as e:
            raise UsageError(_validation_message(e), key=_validation_key(e)) from e

        missing = config.missing_fields()
        if missing:
            raise UsageError(
                f"required by '{config.command.value}' (model {config.model.value})",
                key=missing[0],
            )
        return config

    @staticmethod
    def create_default_config(path: Path) -> None:
        """Create an example configuration file.

        JSON for a .json suffix, YAML otherwise.

        Args:
            path: Path where to create the config file
        """
        default_config = {
            "command": "invert",
            "model": "cw",
            "n_spins": 10000,
            "coupling": 0.6,
            "field": 0.1,
            "sample_count": 20000,
            "replicates": 20,
            "seed": 20170101,
            "workers": 1,
            "output_format": "json",
        }

        path.parent.mkdir(parents=True, exist_ok=True)
        with open(path, "w", encoding="utf-8") as f:
            if path.suffix == ".json":
                json.dump(default_config, f, indent=2)
                f.write("\n")
            else:
                yaml.safe_dump(default_config, f, default_flow_style=False, sort_keys=False, indent=2)
