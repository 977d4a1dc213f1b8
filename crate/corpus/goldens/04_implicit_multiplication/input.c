int main() { int j = 1; int t = 1;
 // P(j,t) {2j < 5t}
 assert(j == t); }
