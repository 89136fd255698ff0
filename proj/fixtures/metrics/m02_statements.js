// inventory bookkeeping for the tide station
let a = 1;
let b = 2;
const c = a + b;

/* running totals */
let total = 0;
total += a;
total += b;
total += c;

let names = ['ebb', 'flood'];
names.push('slack');
let joined = names.join('-');

const station = { id: 'rb-04', depth: 3.2 };
let depth = station.depth;
depth = depth * 2;

let msg = `depth=${depth}`;
msg = msg.toUpperCase();
console.log(msg);

let flag = depth > 5;
flag = !flag;
console.log(flag, joined);
console.log(total);
