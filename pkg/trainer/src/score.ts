/** Batch scoring: one positive-class probability per pair, join-ready. */

import { PairRow, ScoreRow } from './csv.js';
import { PairEncoder } from './model.js';
import { encodeAll } from './train.js';

export function scorePairs(model: PairEncoder, rows: PairRow[], batchSize = 64): ScoreRow[] {
    const encoded = encodeAll(rows, model.spec);
    const out: ScoreRow[] = [];
    for (let i = 0; i < encoded.length; i += batchSize) {
        const probs = model.scoreBatch(encoded.slice(i, i + batchSize));
        probs.forEach((p, j) => {
            const row = rows[i + j];
            out.push({
                basePub: row.basePub,
                candPub: row.candPub,
                score: Math.min(1, Math.max(0, p)),
            });
        });
    }
    return out;
}
