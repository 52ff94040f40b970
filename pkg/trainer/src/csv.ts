/** Pair-file ingestion and score-file emission.
 *
 * The pair CSV contract: header base_pub,cand_pub,claims_x,claims_y,label
 * with label 0/1. Scores go out as base_pub,cand_pub,score with score in
 * [0,1], one row per input pair, so the evaluation harness can join them
 * exactly.
 */

import fs from 'node:fs';
import Papa from 'papaparse';

export interface PairRow {
    basePub: string;
    candPub: string;
    claimsX: string;
    claimsY: string;
    label: 0 | 1;
}

export class SchemaError extends Error {}

const PAIR_HEADER = ['base_pub', 'cand_pub', 'claims_x', 'claims_y', 'label'];

export function readPairs(path: string): PairRow[] {
    const text = fs.readFileSync(path, 'utf-8');
    const parsed = Papa.parse<string[]>(text.replace(/\r\n/g, '\n'), {
        skipEmptyLines: true,
    });
    if (parsed.errors.length > 0) {
        throw new SchemaError(`${path}: ${parsed.errors[0].message}`);
    }
    const rows = parsed.data;
    if (rows.length === 0) {
        throw new SchemaError(`${path}: empty pairs file`);
    }
    const header = rows[0];
    if (header.length !== PAIR_HEADER.length || header.some((h, i) => h !== PAIR_HEADER[i])) {
        throw new SchemaError(`${path}: bad header [${header.join(',')}]`);
    }
    return rows.slice(1).map((rec, idx) => {
        if (rec.length !== PAIR_HEADER.length) {
            throw new SchemaError(`${path}: line ${idx + 2}: expected 5 fields, got ${rec.length}`);
        }
        const label = rec[4];
        if (label !== '0' && label !== '1') {
            throw new SchemaError(`${path}: line ${idx + 2}: label must be 0 or 1, got ${label}`);
        }
        if (!rec[2] || !rec[3]) {
            throw new SchemaError(`${path}: line ${idx + 2}: empty claims text`);
        }
        return {
            basePub: rec[0],
            candPub: rec[1],
            claimsX: rec[2],
            claimsY: rec[3],
            label: Number(label) as 0 | 1,
        };
    });
}

export interface ScoreRow {
    basePub: string;
    candPub: string;
    score: number;
}

export function writeScores(path: string, scores: ScoreRow[]): void {
    for (const s of scores) {
        if (!(s.score >= 0 && s.score <= 1)) {
            throw new RangeError(`score out of [0,1] for ${s.basePub}/${s.candPub}: ${s.score}`);
        }
    }
    const body = Papa.unparse(
        {
            fields: ['base_pub', 'cand_pub', 'score'],
            data: scores.map((s) => [s.basePub, s.candPub, String(s.score)]),
        },
        { newline: '\n' },
    );
    fs.writeFileSync(path, body + '\n', 'utf-8');
}
