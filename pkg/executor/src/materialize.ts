/**
 * Materialize wire-format abstract values into live library values.
 *
 * Tensor content is either inline (exact floats) or a distribution seed; the
 * seed fully determines the elements, via the same generator `mini.rand` and
 * the `__seeded__` constructor use.
 */

import { evaluateExpression } from './exprs';
import { MiniError, Value, checkDtype, checkElementBudget, elementCount, makeTensor, seededValues } from './tensor';

export interface ValueObj {
  kind: string;
  [key: string]: unknown;
}

export function materialize(obj: ValueObj): Value {
  switch (obj.kind) {
    case 'int':
    case 'float':
      return obj.value as number;
    case 'bool':
      return obj.value as boolean;
    case 'str':
      return obj.value as string;
    case 'none':
      return null;
    case 'list':
      return (obj.items as ValueObj[]).map(materialize);
    case 'tuple':
      return { kind: 'tuple', items: (obj.items as ValueObj[]).map(materialize) };
    case 'raw':
      return evaluateExpression(obj.text as string);
    case 'tensor': {
      const shape = obj.shape as number[];
      const dtype = checkDtype(obj.dtype as string);
      if (shape.some((d) => !Number.isInteger(d))) {
        throw new MiniError('TypeError', 'tensor shape entries must be integers');
      }
      if (shape.some((d) => d < 0)) {
        // negative dims are legal wire values but cannot materialize
        throw new MiniError('ValueError', `negative dimension in shape [${shape}]`);
      }
      const content = obj.content as { values?: number[]; seed?: number };
      if (content.values !== undefined) {
        if (content.values.length !== elementCount(shape)) {
          throw new MiniError('ValueError', 'inline tensor content does not fill the shape');
        }
        return makeTensor(shape, dtype, content.values);
      }
      if (content.seed !== undefined) {
        checkElementBudget(elementCount(shape));
        return makeTensor(shape, dtype, seededValues(elementCount(shape), content.seed));
      }
      throw new MiniError('ValueError', 'tensor content must carry values or a seed');
    }
    default:
      throw new MiniError('ValueError', `unknown value kind '${obj.kind}'`);
  }
}
