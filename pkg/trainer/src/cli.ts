#!/usr/bin/env node
/** pair-trainer: `train` fits the classifier on pair CSVs, `score` emits a
 * scores CSV for the evaluation harness. `score --zero-shot` scores with a
 * freshly initialized (untrained) model as the baseline.
 */

import fs from 'node:fs';
import path from 'node:path';
import { readPairs, writeScores } from './csv.js';
import { PairEncoder } from './model.js';
import { scorePairs } from './score.js';
import { DEFAULT_SPEC, parseSpecFile, resolveSpec, TrainSpec } from './spec.js';
import { train } from './train.js';

function parseArgs(argv: string[]): Map<string, string | boolean> {
    const out = new Map<string, string | boolean>();
    for (let i = 0; i < argv.length; i++) {
        const arg = argv[i];
        if (!arg.startsWith('--')) throw new Error(`unexpected argument ${arg}`);
        const key = arg.slice(2);
        if (i + 1 < argv.length && !argv[i + 1].startsWith('--')) {
            out.set(key, argv[++i]);
        } else {
            out.set(key, true);
        }
    }
    return out;
}

const SPEC_FLAGS: Array<[flag: string, key: keyof TrainSpec, numeric: boolean]> = [
    ['model', 'model', false],
    ['epochs', 'epochs', true],
    ['batch-size', 'batchSize', true],
    ['learning-rate', 'learningRate', true],
    ['weight-decay', 'weightDecay', true],
    ['seed', 'seed', true],
    ['max-len', 'maxLen', true],
    ['vocab', 'vocab', true],
    ['dim', 'dim', true],
    ['hidden', 'hidden', true],
];

function specFromArgs(args: Map<string, string | boolean>): TrainSpec {
    const fromFile = args.has('config') ? parseSpecFile(String(args.get('config'))) : {};
    const fromFlags: Partial<TrainSpec> = {};
    for (const [flag, key, numeric] of SPEC_FLAGS) {
        if (args.has(flag)) {
            const value = String(args.get(flag));
            (fromFlags as Record<string, unknown>)[key] = numeric ? Number(value) : value;
        }
    }
    return resolveSpec(fromFile, fromFlags);
}

function need(args: Map<string, string | boolean>, key: string): string {
    const value = args.get(key);
    if (typeof value !== 'string') throw new Error(`--${key} is required`);
    return value;
}

function cmdTrain(args: Map<string, string | boolean>): void {
    const spec = specFromArgs(args);
    const trainRows = readPairs(need(args, 'train'));
    const valRows = args.has('val') ? readPairs(String(args.get('val'))) : [];
    const model = new PairEncoder(spec);
    const logs = train(model, trainRows, valRows, (log) => {
        const val = log.valLoss === null ? 'n/a' : log.valLoss.toFixed(4);
        console.log(`epoch ${log.epoch}: train loss ${log.trainLoss.toFixed(4)}, val loss ${val}`);
    });
    const outDir = need(args, 'out');
    model.save(outDir);
    fs.writeFileSync(
        path.join(outDir, 'training.json'),
        JSON.stringify({ spec, epochs: logs }, null, 2) + '\n',
        'utf-8',
    );
    console.log(`saved model to ${outDir}`);
}

function cmdScore(args: Map<string, string | boolean>): void {
    const rows = readPairs(need(args, 'pairs'));
    let model: PairEncoder;
    if (args.get('zero-shot') === true) {
        model = new PairEncoder(specFromArgs(args));
    } else {
        model = PairEncoder.load(need(args, 'model'));
    }
    const scores = scorePairs(model, rows);
    const out = need(args, 'out');
    writeScores(out, scores);
    console.log(`wrote ${scores.length} scores to ${out}`);
}

export function main(argv: string[]): number {
    const [command, ...rest] = argv;
    try {
        const args = parseArgs(rest);
        if (command === 'train') cmdTrain(args);
        else if (command === 'score') cmdScore(args);
        else if (command === 'defaults') console.log(JSON.stringify(DEFAULT_SPEC, null, 2));
        else throw new Error(`usage: pair-trainer train|score|defaults [--flags]; got ${command ?? '(nothing)'}`);
        return 0;
    } catch (err) {
        console.error(String(err instanceof Error ? err.message : err));
        return 1;
    }
}

const entry = process.argv[1] ? path.resolve(process.argv[1]) : '';
if (entry.endsWith(path.join('dist', 'cli.js'))) {
    process.exit(main(process.argv.slice(2)));
}
