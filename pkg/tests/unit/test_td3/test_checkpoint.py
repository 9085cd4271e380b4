import json

import numpy as np
import pytest

from src.td3.agent import Td3Params
from src.td3.checkpoint import (
    CHECKPOINT_FORMAT,
    CheckpointShapeError,
    load_checkpoint,
    save_checkpoint,
)


@pytest.fixture
def params(small_td3_config, rng):
    return Td3Params.create(19, 49, small_td3_config, rng)


class TestCheckpoint:
    """Saving and restoring trained networks."""

    def test_should_restore_identical_policy(self, params, small_td3_config, tmp_path, rng):
        """A reloaded actor gives the same actions."""
        path = save_checkpoint(params, tmp_path / "checkpoint.json")
        restored = load_checkpoint(path, small_td3_config, obs_dim=19, action_dim=49)

        obs = rng.uniform(0, 1, size=(3, 19))
        np.testing.assert_allclose(restored.act(obs), params.act(obs), rtol=1e-12)
        assert restored.updates == params.updates

    def test_should_write_header(self, params, tmp_path):
        path = save_checkpoint(params, tmp_path / "checkpoint.json")
        document = json.loads(path.read_text())

        assert document['format'] == CHECKPOINT_FORMAT
        assert document['obs_dim'] == 19
        assert document['action_dim'] == 49
        assert document['hidden_sizes'] == [8, 8]

    def test_should_reject_dimension_mismatch(self, params, tmp_path):
        """A 3x3 checkpoint does not fit a 4x4 grid."""
        path = save_checkpoint(params, tmp_path / "checkpoint.json")
        with pytest.raises(CheckpointShapeError):
            load_checkpoint(path, obs_dim=33, action_dim=100)

    def test_should_reject_tampered_network_sizes(self, params, tmp_path):
        path = save_checkpoint(params, tmp_path / "checkpoint.json")
        document = json.loads(path.read_text())
        document['networks']['critic2']['sizes'] = [68, 8, 2]
        path.write_text(json.dumps(document))

        with pytest.raises(CheckpointShapeError):
            load_checkpoint(path)

    def test_should_reject_foreign_files(self, tmp_path):
        """Invalid JSON or a different format is not a checkpoint."""
        garbage = tmp_path / "garbage.json"
        garbage.write_text("{not json")
        other = tmp_path / "other.json"
        other.write_text(json.dumps({'format': 'something-else'}))

        with pytest.raises(CheckpointShapeError):
            load_checkpoint(garbage)
        with pytest.raises(CheckpointShapeError):
            load_checkpoint(other)

    def test_should_raise_for_missing_file(self, tmp_path):
        with pytest.raises(FileNotFoundError):
            load_checkpoint(tmp_path / "absent.json")
