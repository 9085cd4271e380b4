#!/usr/bin/env python3

"""
Swarm pursuit-evasion engine - command line entry point
"""

from dotenv import load_dotenv
load_dotenv()

import argparse
import logging
import sys
from dataclasses import replace
from pathlib import Path
from typing import List, Optional, Sequence

import numpy as np

from config import ConfigError, RunConfig, Settings
from src.allocation.environment import AllocationEnv
from src.allocation.transitions import AllocationError, n_actions
from src.game.simulation import run_episode
from src.geometry.polygon import GeometryError
from src.montecarlo.capture_table import build_capture_table
from src.monitoring.metrics import metrics
from src.monitoring.structured_logging import configure_root_logger
from src.publisher.artifacts import (
    write_capture_times_csv,
    write_json,
    write_jsonl,
    write_trajectory_csv,
)
from src.publisher.svg import write_density_strip, write_snapshots
from src.td3.agent import episode_seed, evaluate_policy, train
from src.td3.checkpoint import CheckpointShapeError, load_checkpoint, save_checkpoint
from src.td3.mlp import NetworkShapeError

# Offset separating evaluation reset seeds from training reset seeds
EVAL_SEED_OFFSET = 1_000_000

EXIT_OK = 0
EXIT_FAILURE = 1


class SwarmRunner:
    """Runs one command against a validated RunConfig and writes its artifacts"""

    def __init__(self, run_config: RunConfig, settings: Settings, out_dir: Path):
        self.config = run_config
        self.settings = settings
        self.out_dir = out_dir
        self.logger = logging.getLogger('swarm_pe.runner')

    def startup(self) -> None:
        self.config.ensure_valid()
        self.out_dir.mkdir(parents=True, exist_ok=True)
        self.logger.info(f"Configuration: {self.config.get_summary()}")

    def _environment(self, table_path: Optional[str]) -> AllocationEnv:
        reward = self.config.reward
        if table_path:
            reward = replace(reward, table_path=table_path)
        return AllocationEnv(grid=self.config.grid, reward=reward)

    def simulate(self) -> List[Path]:
        game = self.config.game
        result = run_episode(game, seed=self.config.seed)
        paths = [write_trajectory_csv(result.trajectories, self.out_dir / "trajectory.csv")]
        paths.extend(write_snapshots(result, game, self.out_dir))
        paths.append(write_json(
            {
                'seed': self.config.seed,
                'terminated_by': result.terminated_by,
                'capture_times': {str(k): v for k, v in sorted(result.capture_times.items())},
            },
            self.out_dir / "episode.json",
        ))
        self.logger.info(
            f"Episode ended by {result.terminated_by}; capture times {result.capture_times}"
        )
        return paths

    def montecarlo(self, table_path: Optional[str]) -> List[Path]:
        """Stats for the configured suite over every sweep ratio; with a table
        path, every configured suite and the capture-time table as well."""
        cfg = self.config.montecarlo
        sweep = self.config.sweep
        policies = sweep.policies if table_path else (cfg.suite,)
        table = build_capture_table(
            policies,
            sweep.ratios,
            cfg=cfg,
            game=self.config.game,
            workers=self.settings.runtime.threads,
            path=table_path,
            progress=sys.stderr.isatty(),
        )

        cases, rows = [], []
        for (ratio, policy), stats in sorted(table.entries.items(), key=lambda e: (e[0][1], e[0][0])):
            n_pursuers = ratio * cfg.n_evaders
            case = f"{policy} {n_pursuers}v{cfg.n_evaders}"
            cases.append({
                'case': case,
                'policy': policy,
                'ratio': ratio,
                'n_pursuers': n_pursuers,
                'n_evaders': cfg.n_evaders,
                **stats.to_dict(),
            })
            rows.append((case, stats.times))
            self.logger.info(f"{case}: mean={stats.mean} std={stats.std} timeouts={stats.timeout_count}")

        paths = [write_json({'base_seed': cfg.base_seed, 'cases': cases}, self.out_dir / "capture_stats.json")]
        paths.append(write_capture_times_csv(rows, self.out_dir / "capture_times.csv"))
        if table_path:
            paths.append(Path(table_path))
        return paths

    def mdp_rollout(self, table_path: Optional[str]) -> List[Path]:
        """Roll out the uniform-spread action (every transition weight 1)."""
        env = self._environment(table_path)
        env.reset(seed=self.config.seed)
        action = np.ones(n_actions(self.config.grid.n))
        done = False
        total = 0.0
        while not done:
            _, reward, done, _ = env.step(action)
            total += reward
        self.logger.info(f"Uniform rollout return {total:.6f} over {env.state.k} steps")
        return [
            write_jsonl(env.rollout, self.out_dir / "rollout.jsonl"),
            write_density_strip(env.rollout, self.out_dir / "density_strip.svg"),
        ]

    def train(self, table_path: Optional[str]) -> List[Path]:
        env = self._environment(table_path)
        log_path = self.out_dir / "training_log.csv"
        result = train(
            env,
            self.config.td3,
            seed=self.config.seed,
            log_path=log_path,
            progress=sys.stderr.isatty(),
        )
        tail = result.returns[-50:]
        self.logger.info(f"Mean return over last {len(tail)} episodes: {np.mean(tail):.6f}")
        return [log_path, save_checkpoint(result.params, self.out_dir / "checkpoint.json")]

    def evaluate(self, checkpoint: str, table_path: Optional[str]) -> List[Path]:
        env = self._environment(table_path)
        params = load_checkpoint(
            checkpoint, self.config.td3,
            obs_dim=env.observation_size, action_dim=env.action_size,
        )
        seeds = [
            episode_seed(self.config.seed, EVAL_SEED_OFFSET + k)
            for k in range(self.config.td3.eval_episodes)
        ]
        evaluation = evaluate_policy(env, params, seeds)
        records = [
            {'episode': episode, **record}
            for episode, rollout in enumerate(evaluation.rollouts)
            for record in rollout
        ]
        self.logger.info(
            f"Greedy evaluation: mean return {evaluation.mean_return:.6f}, "
            f"mean concentration {evaluation.mean_concentration:.6f}"
        )
        return [
            write_jsonl(records, self.out_dir / "rollout.jsonl"),
            write_density_strip(evaluation.rollouts[0], self.out_dir / "density_strip.svg"),
            write_json(
                {
                    'returns': evaluation.returns,
                    'mean_return': evaluation.mean_return,
                    'mean_concentration': evaluation.mean_concentration,
                },
                self.out_dir / "evaluation.json",
            ),
        ]


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog='swarm-pe',
        description='Voronoi pursuit-evasion games, capture-time statistics and TD3 engagement allocation',
    )
    commands = parser.add_subparsers(dest='command', required=True)

    def common(name: str, help_text: str, table_help: Optional[str] = None) -> argparse.ArgumentParser:
        sub = commands.add_parser(name, help=help_text)
        sub.add_argument('--config', help='JSON run configuration')
        sub.add_argument('--seed', type=int, help='Override the configured seed')
        sub.add_argument('--out', help='Output directory (overrides output_dir)')
        if table_help:
            sub.add_argument('--table', help=table_help)
        return sub

    common('simulate', 'Run one episode and write its trajectory and snapshots')
    montecarlo = common('montecarlo', 'Capture-time statistics over random starts',
                        table_help='Also write the capture-time table to this path')
    montecarlo.add_argument('--runs', type=int, help='Override montecarlo.n_runs')
    common('mdp-rollout', 'Roll out the allocation game with a uniform action',
           table_help='Capture-time table to score engagements with')
    common('train', 'Train a TD3 allocation policy',
           table_help='Capture-time table to score engagements with')
    evaluate = common('evaluate', 'Greedy rollouts of a trained policy',
                      table_help='Capture-time table to score engagements with')
    evaluate.add_argument('--checkpoint', required=True, help='Checkpoint written by train')
    return parser


def _apply_overrides(run_config: RunConfig, args: argparse.Namespace) -> RunConfig:
    if args.seed is not None:
        if args.seed < 0:
            raise ConfigError("--seed must be non-negative")
        run_config.seed = args.seed
        run_config.montecarlo.base_seed = args.seed
    if args.out:
        run_config.output_dir = args.out
    if getattr(args, 'runs', None) is not None:
        run_config.montecarlo.n_runs = args.runs
    return run_config


def run(args: argparse.Namespace, settings: Settings) -> List[Path]:
    run_config = _apply_overrides(RunConfig.load(args.config), args)
    runner = SwarmRunner(run_config, settings, Path(run_config.output_dir))
    runner.startup()
    table = getattr(args, 'table', None)
    if args.command == 'simulate':
        return runner.simulate()
    if args.command == 'montecarlo':
        return runner.montecarlo(table)
    if args.command == 'mdp-rollout':
        return runner.mdp_rollout(table)
    if args.command == 'train':
        return runner.train(table)
    return runner.evaluate(args.checkpoint, table)


def main(argv: Optional[Sequence[str]] = None) -> int:
    """Parse arguments, run the command, return the process exit code"""
    args = build_parser().parse_args(argv)
    try:
        settings = Settings.from_env()
    except ConfigError as e:
        print(f"config error: {e}", file=sys.stderr)
        return EXIT_FAILURE
    configure_root_logger(settings.logging)
    logger = logging.getLogger('swarm_pe')
    metrics.reset()

    try:
        paths = run(args, settings)
    except ConfigError as e:
        for issue in e.issues:
            print(f"config error: {issue}", file=sys.stderr)
        return EXIT_FAILURE
    except (CheckpointShapeError, NetworkShapeError) as e:
        print(f"shape error: {e}", file=sys.stderr)
        return EXIT_FAILURE
    except FileNotFoundError as e:
        print(f"file not found: {e}", file=sys.stderr)
        return EXIT_FAILURE
    except (AllocationError, GeometryError, OSError, ValueError) as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_FAILURE
    finally:
        metrics.log_summary()

    for path in paths:
        logger.info(f"Artifact: {path}")
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
