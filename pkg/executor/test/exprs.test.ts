import { describe, expect, it } from 'vitest';

import { evaluateExpression, invokeByName } from '../src/exprs';
import { MiniError, Tensor } from '../src/tensor';

describe('expression evaluation', () => {
  it('literals', () => {
    expect(evaluateExpression('5')).toBe(5);
    expect(evaluateExpression('-2.5')).toBe(-2.5);
    expect(evaluateExpression('1e3')).toBe(1000);
    expect(evaluateExpression("'f32'")).toBe('f32');
    expect(evaluateExpression('"two words"')).toBe('two words');
    expect(evaluateExpression('True')).toBe(true);
    expect(evaluateExpression('None')).toBeNull();
    expect(evaluateExpression('[1, 2, 3]')).toEqual([1, 2, 3]);
    expect(evaluateExpression('(1, 2)')).toEqual({ kind: 'tuple', items: [1, 2] });
    expect(evaluateExpression('(1,)')).toEqual({ kind: 'tuple', items: [1] });
    expect(evaluateExpression('(1)')).toBe(1);
  });

  it('string escapes', () => {
    expect(evaluateExpression("'a\\nb'")).toBe('a\nb');
    expect(evaluateExpression("'it\\'s'")).toBe("it's");
    expect(evaluateExpression("'\\x41'")).toBe('A');
  });

  it('reserved tensor constructors', () => {
    const t = evaluateExpression("__tensor__([0.5, -1.25], [2], 'f32')") as Tensor;
    expect(t.shape).toEqual([2]);
    expect(t.data).toEqual([0.5, -1.25]);
    const s1 = evaluateExpression("__seeded__([2, 2], 'f64', 7)") as Tensor;
    const s2 = evaluateExpression("__seeded__([2, 2], 'f64', 7)") as Tensor;
    expect(s1.data).toEqual(s2.data);
  });

  it('library calls with keywords and attribute access', () => {
    const z = evaluateExpression("mini.zeros([2, 2], dtype='i32')") as Tensor;
    expect(z.dtype).toBe('i32');
    expect(evaluateExpression("__tensor__([1], [1], 'f64').dtype")).toBe('f64');
    expect(evaluateExpression("__tensor__([1, 2], [2], 'f64').shape")).toEqual([2]);
  });

  it('the rendered template expression from the docs evaluates', () => {
    const v = evaluateExpression(
      "mini.zeros([4], __tensor__([0.5, -1.25], [2], 'f32').dtype)",
    ) as Tensor;
    expect(v.shape).toEqual([4]);
    expect(v.dtype).toBe('f32');
  });

  it('rejects unknown names, bad syntax, and trailing tokens', () => {
    expect(() => evaluateExpression('other.lib(1)')).toThrowError(MiniError);
    expect(() => evaluateExpression('mini.zeros([2)')).toThrowError(MiniError);
    expect(() => evaluateExpression('1 2')).toThrowError(/trailing/);
    expect(() => evaluateExpression('mini')).toThrowError(/not a value/);
  });
});

describe('invokeByName argument binding', () => {
  it('binds keywords to positional slots', () => {
    const t = invokeByName('mini.rand', [[2]], { seed: 9 }) as Tensor;
    expect(t.shape).toEqual([2]);
  });

  it('rejects unknown and duplicate keywords and extra positionals', () => {
    expect(() => invokeByName('mini.zeros', [[1]], { nope: 1 })).toThrowError(/no argument/);
    expect(() => invokeByName('mini.zeros', [[1], 'f32'], { dtype: 'f64' })).toThrowError(/duplicate/);
    expect(() => invokeByName('mini.zeros', [[1], 'f32', 0], {})).toThrowError(/at most/);
  });

  it('missing required argument surfaces as a type error', () => {
    expect(() => invokeByName('mini.tensor_split', [], {})).toThrowError(MiniError);
  });
});
