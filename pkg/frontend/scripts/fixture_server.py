"""Start a suggestion server over a small generated fixture world.

Used by the frontend end-to-end tests; everything derives from one seed.
"""

import argparse

import uvicorn

from cellac.benchmark import generate_world
from cellac.config import EngineConfig
from cellac.engine import Engine
from cellac.server import create_app


def main() -> None:
    ap = argparse.ArgumentParser()
    ap.add_argument("--port", type=int, default=8137)
    ap.add_argument("--seed", type=int, default=13)
    args = ap.parse_args()
    world = generate_world(seed=args.seed, n_players=24, tables_per_topic=18,
                           n_train_cells=80, n_eval_cells=10, n_tmatch_pairs=60)
    engine = Engine(world.corpus, world.kb, world.stats, world.embeddings,
                    world.tmatch_model, world.ltr_models["ltr_full"], EngineConfig())
    uvicorn.run(create_app(engine), host="127.0.0.1", port=args.port,
                log_level="warning")


if __name__ == "__main__":
    main()
