/** Training hyperparameters and the KEY=VALUE config file that carries them. */

import fs from 'node:fs';

export interface TrainSpec {
    /** architecture identifier recorded in the artifact */
    model: string;
    epochs: number;
    batchSize: number;
    learningRate: number;
    weightDecay: number;
    loss: 'cross-entropy';
    seed: number;
    /** tokens kept per claims text; longer texts are truncated */
    maxLen: number;
    vocab: number;
    dim: number;
    hidden: number;
}

export const DEFAULT_SPEC: TrainSpec = {
    model: 'compact-pair-encoder',
    epochs: 3,
    batchSize: 16,
    learningRate: 2e-5,
    weightDecay: 0.01,
    loss: 'cross-entropy',
    seed: 0,
    maxLen: 64,
    vocab: 2048,
    dim: 32,
    hidden: 64,
};

const NUMERIC_KEYS = new Set([
    'epochs', 'batch_size', 'learning_rate', 'weight_decay', 'seed',
    'max_len', 'vocab', 'dim', 'hidden',
]);

const KEY_MAP: Record<string, keyof TrainSpec> = {
    model: 'model',
    epochs: 'epochs',
    batch_size: 'batchSize',
    learning_rate: 'learningRate',
    weight_decay: 'weightDecay',
    loss: 'loss',
    seed: 'seed',
    max_len: 'maxLen',
    vocab: 'vocab',
    dim: 'dim',
    hidden: 'hidden',
};

export function parseSpecFile(path: string): Partial<TrainSpec> {
    const out: Record<string, unknown> = {};
    const lines = fs.readFileSync(path, 'utf-8').split('\n');
    lines.forEach((raw, i) => {
        const line = raw.trim();
        if (!line || line.startsWith('#')) return;
        const eq = line.indexOf('=');
        if (eq < 0) throw new Error(`${path}:${i + 1}: expected KEY=VALUE`);
        const key = line.slice(0, eq).trim();
        const value = line.slice(eq + 1).trim();
        const mapped = KEY_MAP[key];
        if (!mapped) throw new Error(`${path}:${i + 1}: unknown key ${key}`);
        if (key === 'loss' && value !== 'cross-entropy') {
            throw new Error(`${path}:${i + 1}: only cross-entropy loss is supported`);
        }
        out[mapped] = NUMERIC_KEYS.has(key) ? Number(value) : value;
    });
    return out as Partial<TrainSpec>;
}

export function resolveSpec(...overrides: Array<Partial<TrainSpec>>): TrainSpec {
    const spec = Object.assign({}, DEFAULT_SPEC, ...overrides) as TrainSpec;
    if (spec.epochs < 0 || !Number.isInteger(spec.epochs)) throw new Error('epochs must be a non-negative integer');
    if (spec.batchSize < 1) throw new Error('batch_size must be >= 1');
    if (spec.learningRate <= 0) throw new Error('learning_rate must be positive');
    if (spec.weightDecay < 0) throw new Error('weight_decay must be >= 0');
    return spec;
}
