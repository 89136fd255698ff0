const square = (n) => n * n;
const tides = ['ebb', 'flood'];
const labels = tides.map((t) => t.toUpperCase());
const sum = tides.reduce((acc, t) => {
  return acc + t.length;
}, 0);
console.log(square(2), labels, sum);
