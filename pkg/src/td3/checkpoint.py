#!/usr/bin/env python3
"""JSON weight dumps for trained TD3 networks."""

import json
import logging
from pathlib import Path
from typing import Optional

from src.td3.agent import Td3Config, Td3Params
from src.td3.mlp import Mlp, NetworkShapeError

logger = logging.getLogger(__name__)

CHECKPOINT_FORMAT = "swarm-pe-td3"
CHECKPOINT_VERSION = 1
NETWORKS = ("actor", "critic1", "critic2", "actor_target", "critic1_target", "critic2_target")


class CheckpointShapeError(ValueError):
    """Checkpoint contents do not fit the expected network shapes."""


def save_checkpoint(params: Td3Params, path: Path | str) -> Path:
    """Header {format, version, obs_dim, action_dim, hidden_sizes} plus one
    {sizes, weights, biases, ...} entry per network."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    document = {
        'format': CHECKPOINT_FORMAT,
        'version': CHECKPOINT_VERSION,
        'obs_dim': params.obs_dim,
        'action_dim': params.action_dim,
        'hidden_sizes': list(params.actor.sizes[1:-1]),
        'updates': params.updates,
        'networks': {name: getattr(params, name).to_dict() for name in NETWORKS},
    }
    with open(path, 'w', encoding='utf-8') as file:
        json.dump(document, file)
    logger.info(f"Saved checkpoint to {path}")
    return path


def load_checkpoint(
    path: Path | str,
    cfg: Optional[Td3Config] = None,
    obs_dim: Optional[int] = None,
    action_dim: Optional[int] = None,
) -> Td3Params:
    """Rebuild Td3Params, checking the header against the expected dimensions.

    Raises:
        FileNotFoundError: no file at path.
        CheckpointShapeError: unknown format, or shapes that do not match
            obs_dim/action_dim or each other.
    """
    path = Path(path)
    if not path.exists():
        raise FileNotFoundError(f"Checkpoint not found: {path}")
    try:
        with open(path, 'r', encoding='utf-8') as file:
            document = json.load(file)
    except json.JSONDecodeError as e:
        raise CheckpointShapeError(f"{path} is not valid JSON: {e}") from e

    if not isinstance(document, dict) or document.get('format') != CHECKPOINT_FORMAT:
        raise CheckpointShapeError(f"{path} is not a TD3 checkpoint")
    stored_obs, stored_action = int(document['obs_dim']), int(document['action_dim'])
    if obs_dim is not None and stored_obs != obs_dim:
        raise CheckpointShapeError(
            f"Checkpoint observation size {stored_obs} does not match environment size {obs_dim}"
        )
    if action_dim is not None and stored_action != action_dim:
        raise CheckpointShapeError(
            f"Checkpoint action size {stored_action} does not match environment size {action_dim}"
        )

    hidden = [int(h) for h in document['hidden_sizes']]
    expected = {
        'actor': (stored_obs, *hidden, stored_action),
        'critic': (stored_obs + stored_action, *hidden, 1),
    }
    networks = {}
    for name in NETWORKS:
        data = document['networks'].get(name)
        if data is None:
            raise CheckpointShapeError(f"Checkpoint is missing network '{name}'")
        want = expected['actor' if name.startswith('actor') else 'critic']
        if tuple(data['sizes']) != want:
            raise CheckpointShapeError(
                f"Network '{name}' has sizes {tuple(data['sizes'])}, expected {want}"
            )
        try:
            networks[name] = Mlp.from_dict(data)
        except (NetworkShapeError, ValueError) as e:
            raise CheckpointShapeError(f"Network '{name}': {e}") from e

    cfg = cfg or Td3Config(hidden_sizes=tuple(hidden))
    params = Td3Params.from_networks(networks['actor'], networks['critic1'], networks['critic2'], cfg)
    params.actor_target = networks['actor_target']
    params.critic1_target = networks['critic1_target']
    params.critic2_target = networks['critic2_target']
    params.updates = int(document.get('updates', 0))
    logger.info(f"Loaded checkpoint {path} (obs {stored_obs}, actions {stored_action})")
    return params
