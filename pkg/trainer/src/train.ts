/** Seeded training loop: Adam with decoupled weight decay, cross-entropy. */

import * as tf from '@tensorflow/tfjs';
import { PairRow } from './csv.js';
import { EncodedPair, PairEncoder, encodePair } from './model.js';
import { TrainSpec } from './spec.js';

export interface EpochLog {
    epoch: number;
    trainLoss: number;
    valLoss: number | null;
}

/** mulberry32: deterministic shuffle source */
function rng(seed: number): () => number {
    let a = seed >>> 0;
    return () => {
        a = (a + 0x6d2b79f5) | 0;
        let t = Math.imul(a ^ (a >>> 15), 1 | a);
        t = (t + Math.imul(t ^ (t >>> 7), 61 | t)) ^ t;
        return ((t ^ (t >>> 14)) >>> 0) / 4294967296;
    };
}

function shuffled<T>(items: T[], rand: () => number): T[] {
    const out = items.slice();
    for (let i = out.length - 1; i > 0; i--) {
        const j = Math.floor(rand() * (i + 1));
        [out[i], out[j]] = [out[j], out[i]];
    }
    return out;
}

function batchTensors(batch: EncodedPair[], maxLen: number) {
    const idsX = tf.tensor2d(batch.flatMap((p) => Array.from(p.idsX)), [batch.length, maxLen], 'int32');
    const idsY = tf.tensor2d(batch.flatMap((p) => Array.from(p.idsY)), [batch.length, maxLen], 'int32');
    const labels = tf.oneHot(tf.tensor1d(batch.map((p) => p.label), 'int32'), 2);
    return { idsX, idsY, labels };
}

function meanLoss(model: PairEncoder, pairs: EncodedPair[], batchSize: number): number {
    let total = 0;
    let count = 0;
    for (let i = 0; i < pairs.length; i += batchSize) {
        const batch = pairs.slice(i, i + batchSize);
        const loss = tf.tidy(() => {
            const { idsX, idsY, labels } = batchTensors(batch, model.spec.maxLen);
            return tf.losses.softmaxCrossEntropy(labels, model.logits(idsX, idsY)).dataSync()[0];
        });
        total += loss * batch.length;
        count += batch.length;
    }
    return count ? total / count : NaN;
}

export function encodeAll(rows: PairRow[], spec: TrainSpec): EncodedPair[] {
    return rows.map((r) => encodePair(r.claimsX, r.claimsY, r.label, spec));
}

export function train(
    model: PairEncoder,
    trainRows: PairRow[],
    valRows: PairRow[],
    onEpoch?: (log: EpochLog) => void,
): EpochLog[] {
    const spec = model.spec;
    const trainPairs = encodeAll(trainRows, spec);
    const valPairs = encodeAll(valRows, spec);
    const optimizer = tf.train.adam(spec.learningRate);
    const rand = rng(spec.seed + 1);
    const logs: EpochLog[] = [];
    const decay = spec.learningRate * spec.weightDecay;

    for (let epoch = 0; epoch < spec.epochs; epoch++) {
        const order = shuffled(trainPairs, rand);
        let running = 0;
        for (let start = 0; start < order.length; start += spec.batchSize) {
            const batch = order.slice(start, start + spec.batchSize);
            const { idsX, idsY, labels } = batchTensors(batch, spec.maxLen);
            const { value, grads } = tf.variableGrads(
                () => tf.losses.softmaxCrossEntropy(labels, model.logits(idsX, idsY)) as tf.Scalar,
                model.trainable(),
            );
            // tfjs types applyGradients for variables, but it takes the
            // gradient map keyed by variable name
            optimizer.applyGradients(grads as unknown as Parameters<typeof optimizer.applyGradients>[0]);
            running += value.dataSync()[0] * batch.length;
            value.dispose();
            Object.values(grads).forEach((g) => g.dispose());
            idsX.dispose();
            idsY.dispose();
            labels.dispose();
            if (decay > 0) {
                // decoupled weight decay on matrices only, after the Adam step
                tf.tidy(() => {
                    for (const w of model.decayed()) w.assign(w.mul(1 - decay));
                });
            }
        }
        const log: EpochLog = {
            epoch,
            trainLoss: order.length ? running / order.length : NaN,
            valLoss: valPairs.length ? meanLoss(model, valPairs, spec.batchSize) : null,
        };
        logs.push(log);
        onEpoch?.(log);
    }
    optimizer.dispose();
    return logs;
}
