"""Command line entry points."""

import json
import sys

import click

from .. import corpus
from ..nnet import TrainConfig, evaluate, init_weights, load_model, save_model, train
from ..store import EventLog
from .config import ServiceConfig


def _features(samples):
    from ..dsp import compute_mfcc
    return [(compute_mfcc(s.chunk), s.label) for s in samples]


@click.group()
def main():
    """Snore detection and nudge pipeline."""


@main.command()
@click.option("--config", "config_path", required=True, type=click.Path(exists=True))
@click.option("--dry-run", is_flag=True, help="Ignore the configured device; log triggers only.")
def run(config_path, dry_run):
    """Run the service (HTTP/WS API for the dashboard)."""
    import uvicorn

    from .api import ServiceState, create_app

    cfg = ServiceConfig.from_file(config_path)
    if dry_run:
        cfg.device = None
    state = ServiceState(cfg, EventLog(cfg.log_dir))
    host, _, port = cfg.listen_addr.partition(":")
    uvicorn.run(create_app(state), host=host or "127.0.0.1", port=int(port or 8800))


@main.command()
@click.option("--wav", "wav_path", required=True, type=click.Path(exists=True))
@click.option("--config", "config_path", required=True, type=click.Path(exists=True))
def replay(wav_path, config_path):
    """Process a WAV file through the full pipeline deterministically."""
    from .pipeline import run_replay_wav

    cfg = ServiceConfig.from_file(config_path)
    log = EventLog(cfg.log_dir)
    device = None
    if cfg.device:
        from ..actuator.transport import DeviceClient
        device = DeviceClient(cfg.device)
    session_id, events, core = run_replay_wav(wav_path, cfg, log, device=device)
    click.echo(json.dumps({"session_id": session_id, **core.summary()}))


@main.command()
@click.option("--data", "data_dir", type=click.Path(exists=True),
              help="Directory with snore/*.wav and non_snore/*.wav.")
@click.option("--synthetic", is_flag=True, help="Train on the generated corpus instead.")
@click.option("--epochs", default=5, show_default=True)
@click.option("--seed", default=0, show_default=True)
@click.option("--out", "out_path", required=True, type=click.Path())
def train_cmd(data_dir, synthetic, epochs, seed, out_path):
    """Train the classifier (on real data or the synthetic corpus)."""
    if synthetic == bool(data_dir):
        raise click.UsageError("pass exactly one of --data or --synthetic")
    if synthetic:
        samples = corpus.generate_synthetic_corpus(corpus.CorpusSpec(seed=seed))
    else:
        samples = corpus.load_directory(data_dir)
    train_set, test_set = corpus.split_dataset(samples, 0.8, seed)
    click.echo(f"{len(train_set)} train / {len(test_set)} test samples; extracting features...")
    train_feats = _features(train_set)
    test_feats = _features(test_set)
    model = init_weights(seed)
    cfg = TrainConfig(max_epochs=epochs, seed=seed)
    train(model, train_feats, cfg,
          progress=lambda e, l: click.echo(f"epoch {e}: loss {l:.4f}"))
    acc = evaluate(model, test_feats)
    save_model(model, out_path)
    click.echo(f"held-out accuracy: {acc:.1%}; model saved to {out_path}")


main.add_command(train_cmd, name="train")


@main.command("eval")
@click.option("--data", "data_dir", type=click.Path(exists=True))
@click.option("--synthetic", is_flag=True)
@click.option("--seed", default=0, show_default=True)
@click.option("--model", "model_path", required=True, type=click.Path(exists=True))
def eval_cmd(data_dir, synthetic, seed, model_path):
    """Evaluate a saved model; reports accuracy on the held-out split."""
    if synthetic == bool(data_dir):
        raise click.UsageError("pass exactly one of --data or --synthetic")
    if synthetic:
        samples = corpus.generate_synthetic_corpus(corpus.CorpusSpec(seed=seed))
    else:
        samples = corpus.load_directory(data_dir)
    _, test_set = corpus.split_dataset(samples, 0.8, seed)
    model = load_model(model_path)
    acc = evaluate(model, _features(test_set))
    click.echo(f"accuracy: {acc:.1%} over {len(test_set)} samples")


@main.command("simulate-device")
@click.option("--listen", required=True, help="host:port to serve the device protocol on.")
@click.option("--scenario", "scenario_path", type=click.Path(exists=True))
def simulate_device(listen, scenario_path):
    """Run the device simulator."""
    from ..actuator.simulator import Scenario, run_simulator

    scenario = Scenario.from_file(scenario_path) if scenario_path else None
    sim = run_simulator(listen, scenario)
    click.echo(f"device simulator listening on {sim.address}")
    try:
        sim._thread.join()
    except KeyboardInterrupt:
        sim.stop()


if __name__ == "__main__":
    sys.exit(main())
