import fs from 'node:fs';
import os from 'node:os';
import path from 'node:path';
import { describe, expect, it } from 'vitest';
import { DEFAULT_SPEC, parseSpecFile, resolveSpec } from '../src/spec.js';

describe('training spec', () => {
    it('defaults carry the reference fine-tuning settings', () => {
        expect(DEFAULT_SPEC.epochs).toBe(3);
        expect(DEFAULT_SPEC.batchSize).toBe(16);
        expect(DEFAULT_SPEC.learningRate).toBe(2e-5);
        expect(DEFAULT_SPEC.weightDecay).toBe(0.01);
        expect(DEFAULT_SPEC.loss).toBe('cross-entropy');
    });

    it('parses a key-value config file', () => {
        const file = path.join(fs.mkdtempSync(path.join(os.tmpdir(), 'spec-')), 'train.cfg');
        fs.writeFileSync(file, '# comment\nepochs = 5\nlearning_rate = 0.001\nmodel = tiny\n');
        const spec = resolveSpec(parseSpecFile(file));
        expect(spec.epochs).toBe(5);
        expect(spec.learningRate).toBe(0.001);
        expect(spec.model).toBe('tiny');
        expect(spec.batchSize).toBe(16); // untouched default
    });

    it('rejects unknown keys and foreign loss functions', () => {
        const dir = fs.mkdtempSync(path.join(os.tmpdir(), 'spec-'));
        const bad = path.join(dir, 'bad.cfg');
        fs.writeFileSync(bad, 'nonsense = 1\n');
        expect(() => parseSpecFile(bad)).toThrow(/unknown key/);
        const badLoss = path.join(dir, 'loss.cfg');
        fs.writeFileSync(badLoss, 'loss = hinge\n');
        expect(() => parseSpecFile(badLoss)).toThrow(/cross-entropy/);
    });

    it('later overrides win', () => {
        const spec = resolveSpec({ epochs: 9 }, { epochs: 2 });
        expect(spec.epochs).toBe(2);
    });

    it('validates ranges', () => {
        expect(() => resolveSpec({ epochs: -1 })).toThrow();
        expect(() => resolveSpec({ learningRate: 0 })).toThrow();
        expect(() => resolveSpec({ batchSize: 0 })).toThrow();
    });
});
